fn main() -> std::process::ExitCode {
    capcone::cli::main()
}
