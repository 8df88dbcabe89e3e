fn main() {
    std::process::exit(algturan::cli::run(std::env::args_os()));
}
