fn main() {
    std::process::exit(witt_omega::cli::main());
}
