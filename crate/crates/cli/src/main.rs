fn main() {
    std::process::exit(backscatter_cli::main_with_args(std::env::args_os()));
}
