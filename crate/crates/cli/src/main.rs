fn main() {
    std::process::exit(lpc_enhance::run_cli(std::env::args_os()));
}
