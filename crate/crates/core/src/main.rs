use pauli_separator::cli;

fn main() {
    std::process::exit(cli::run());
}
