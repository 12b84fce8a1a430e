fn main() {
    std::process::exit(tefs::cli::run(std::env::args_os()));
}
