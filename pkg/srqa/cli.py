import click
from flask.cli import FlaskGroup
from srqa import create_app


@click.group(cls=FlaskGroup, create_app=create_app, add_version_option=False, load_dotenv=False)
def cli():
    """No-reference quality assessment for super-resolved images."""
