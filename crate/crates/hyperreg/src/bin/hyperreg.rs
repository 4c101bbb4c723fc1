fn main() {
    std::process::exit(hyperreg::cli::run(std::env::args_os()));
}
