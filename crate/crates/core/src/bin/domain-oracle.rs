fn main() {
    std::process::exit(domain_oracle::cli::run(std::env::args_os()));
}
