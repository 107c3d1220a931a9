fn main() {
    std::process::exit(unassume::cli::main_entry(std::env::args_os()));
}
