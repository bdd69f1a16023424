fn main() {
    std::process::exit(selpref::cli::main());
}
