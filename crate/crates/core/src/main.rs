fn main() {
    std::process::exit(regretlab::cli::run());
}
