fn main() {
    std::process::exit(fibration::cli::main());
}
