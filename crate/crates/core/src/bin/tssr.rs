fn main() {
    std::process::exit(tssr::cli::run(std::env::args_os()));
}
