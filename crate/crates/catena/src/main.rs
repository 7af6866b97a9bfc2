fn main() {
    std::process::exit(catena::cli::run());
}
