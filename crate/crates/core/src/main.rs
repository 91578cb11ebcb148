fn main() {
    std::process::exit(neumann_cert::cli::run(std::env::args_os()));
}
