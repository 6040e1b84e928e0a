from .app import app

import main.commands

# Register CLI commands
main.commands.register_commands(app)
