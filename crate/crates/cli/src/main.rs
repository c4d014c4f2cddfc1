fn main() {
    std::process::exit(bilocal_cli::run(std::env::args_os()));
}
