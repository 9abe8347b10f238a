fn main() { std::process::exit(skewlab::cli::main()) }
