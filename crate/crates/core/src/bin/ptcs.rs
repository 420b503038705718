fn main() {
    std::process::exit(ptcs::cli::run(std::env::args_os()));
}
