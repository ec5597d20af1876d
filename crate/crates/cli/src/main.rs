fn main() {
    std::process::exit(bipi_cli::main_with_args(std::env::args_os()));
}
