from flask.cli import FlaskGroup

from main.core import app

cli = FlaskGroup(create_app=lambda *args: app)

if __name__ == '__main__':
    cli()
