"""Results schema

Revision ID: 3f1a9c0d7b21
Revises:
Create Date: 2026-10-18 14:02:11.482913

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '3f1a9c0d7b21'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('experiments',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('instance_name', sa.String(length=100), nullable=False),
    sa.Column('kind', sa.String(length=10), nullable=False),
    sa.Column('base_seed', sa.BigInteger(), nullable=False),
    sa.Column('runs_per_config', sa.Integer(), nullable=False),
    sa.Column('cutoff_seconds', sa.Float(), nullable=True),
    sa.Column('iteration_budget', sa.BigInteger(), nullable=True),
    sa.Column('best_known', sa.BigInteger(), nullable=True),
    sa.Column('confidence', sa.Float(), nullable=False),
    sa.Column('created_at', sa.DateTime(), nullable=False),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_experiments_id'), 'experiments', ['id'], unique=False)
    op.create_index(op.f('ix_experiments_instance_name'), 'experiments', ['instance_name'], unique=False)
    op.create_index(op.f('ix_experiments_created_at'), 'experiments', ['created_at'], unique=False)
    op.create_table('run_results',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('experiment_id', sa.Integer(), nullable=False),
    sa.Column('strategy', sa.String(length=10), nullable=False),
    sa.Column('history_length', sa.Integer(), nullable=False),
    sa.Column('counting', sa.String(length=10), nullable=False),
    sa.Column('run_index', sa.Integer(), nullable=False),
    sa.Column('seed', sa.BigInteger(), nullable=False),
    sa.Column('best_fitness', sa.BigInteger(), nullable=False),
    sa.Column('deviation', sa.BigInteger(), nullable=True),
    sa.Column('time_to_last_best', sa.Float(), nullable=False),
    sa.Column('last_best_iteration', sa.BigInteger(), nullable=False),
    sa.Column('hc_like_pct', sa.Float(), nullable=False),
    sa.Column('iterations', sa.BigInteger(), nullable=False),
    sa.Column('accepted', sa.BigInteger(), nullable=False),
    sa.ForeignKeyConstraint(['experiment_id'], ['experiments.id'], ),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_run_results_id'), 'run_results', ['id'], unique=False)
    op.create_index(op.f('ix_run_results_experiment_id'), 'run_results', ['experiment_id'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_run_results_experiment_id'), table_name='run_results')
    op.drop_index(op.f('ix_run_results_id'), table_name='run_results')
    op.drop_table('run_results')
    op.drop_index(op.f('ix_experiments_created_at'), table_name='experiments')
    op.drop_index(op.f('ix_experiments_instance_name'), table_name='experiments')
    op.drop_index(op.f('ix_experiments_id'), table_name='experiments')
    op.drop_table('experiments')
