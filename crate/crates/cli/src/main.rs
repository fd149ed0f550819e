use clap::Parser;

fn main() -> anyhow::Result<()> {
    hoaxnet_cli::execute(hoaxnet_cli::Cli::parse())
}
