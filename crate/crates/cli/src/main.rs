fn main() {
    std::process::exit(qcontrol_cli::run_command(std::env::args_os()));
}
