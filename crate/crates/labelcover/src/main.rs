fn main() {
    std::process::exit(labelcover::cli::run());
}
