fn main() {
    std::process::exit(oplambda::cli::run_main(std::env::args_os()));
}
