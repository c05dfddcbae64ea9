fn main() {
    std::process::exit(strip_riesz::cli::run(std::env::args_os()));
}
