fn main() {
    std::process::exit(stabcert::cli::run_from(std::env::args_os()));
}
