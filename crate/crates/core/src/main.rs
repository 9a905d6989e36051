fn main() {
    std::process::exit(levy::cli::run(std::env::args_os()));
}
