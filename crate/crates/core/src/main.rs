fn main() {
    std::process::exit(strongfield::cli::run(std::env::args_os()));
}
