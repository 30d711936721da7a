fn main() -> std::process::ExitCode {
    piv_cli::run(std::env::args_os())
}
