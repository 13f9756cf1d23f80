fn main() {
    std::process::exit(paracurate::cli::run(std::env::args_os()));
}
