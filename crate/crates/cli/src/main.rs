fn main() {
    std::process::exit(riccati_cli::run(std::env::args_os()));
}
