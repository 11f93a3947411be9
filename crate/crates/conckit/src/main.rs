fn main() {
    std::process::exit(conckit::cli::main());
}
