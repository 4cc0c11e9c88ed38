fn main() {
    std::process::exit(bsf::cli::run());
}
