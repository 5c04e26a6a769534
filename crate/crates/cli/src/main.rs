fn main() {
    std::process::exit(quasitoda_cli::main_with(std::env::args()));
}
