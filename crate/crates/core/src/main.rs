fn main() {
    std::process::exit(winnowtc::cli::main());
}
