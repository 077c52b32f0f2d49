fn main() { std::process::exit(pstirling::cli::run()); }
