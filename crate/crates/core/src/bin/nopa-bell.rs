fn main() {
    std::process::exit(nopa_bell::cli::main_with_args(std::env::args_os()));
}
