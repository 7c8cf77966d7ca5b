fn main() {
    std::process::exit(qrw_cli::run(std::env::args_os()));
}
