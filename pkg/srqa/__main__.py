from srqa.cli import cli

cli(prog_name="srqa")
