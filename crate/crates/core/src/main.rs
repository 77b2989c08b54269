fn main() {
    std::process::exit(persphere::cli::run(std::env::args_os()));
}
