fn main() { std::process::exit(sugeno_hadamard::cli::main_exit()) }
