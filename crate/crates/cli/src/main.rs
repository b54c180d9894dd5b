fn main() {
    std::process::exit(qrg_cli::run(std::env::args_os()));
}
