fn main() {
    std::process::exit(chis::cli::main_with_args(std::env::args_os()));
}
