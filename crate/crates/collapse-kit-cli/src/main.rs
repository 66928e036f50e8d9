fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(collapse_kit_cli::run_main())
}
