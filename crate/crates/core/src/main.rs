fn main() {
    std::process::exit(matchspeed::cli::run());
}
