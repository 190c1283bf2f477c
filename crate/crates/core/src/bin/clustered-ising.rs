fn main() {
    std::process::exit(clustered_ising::cli::main_with_args(std::env::args_os()));
}
