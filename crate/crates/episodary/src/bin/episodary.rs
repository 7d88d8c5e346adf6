fn main() {
    std::process::exit(episodary::cli::run());
}
