fn main() -> std::process::ExitCode {
    gspecies_cli::main_with(std::env::args_os())
}
