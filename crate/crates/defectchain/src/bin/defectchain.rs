fn main() -> std::process::ExitCode {
    defectchain::cli::main()
}
