fn main() {
    std::process::exit(metacell::cli::main_entry());
}
