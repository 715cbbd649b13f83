fn main() { std::process::exit(hbspectra::cli::run_from_args()); }
