fn main() {
    std::process::exit(twisted_fourier::cli::main_with_args(std::env::args_os()));
}
