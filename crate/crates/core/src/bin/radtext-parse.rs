fn main() {
    std::process::exit(radtext::cli::main_for("parse"));
}
