"""feature records

Revision ID: 5c1e7a2f9b30
Revises: 
Create Date: 2026-10-19 09:12:40.118204

"""
from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision = '5c1e7a2f9b30'
down_revision = None
branch_labels = None
depends_on = None


def upgrade():
    # ### commands auto generated by Alembic - please adjust! ###
    op.create_table('feature_records',
    sa.Column('id', sa.String(length=32), nullable=False),
    sa.Column('content_hash', sa.String(length=64), nullable=False),
    sa.Column('extractor_version', sa.String(length=16), nullable=False),
    sa.Column('source_path', sa.String(length=1024), nullable=False),
    sa.Column('values', sa.Text(), nullable=False),
    sa.Column('created_at', sa.DateTime(), nullable=False),
    sa.PrimaryKeyConstraint('id'),
    sa.UniqueConstraint('content_hash', 'extractor_version', name='uq_feature_records_hash_version')
    )
    with op.batch_alter_table('feature_records', schema=None) as batch_op:
        batch_op.create_index(batch_op.f('ix_feature_records_content_hash'), ['content_hash'], unique=False)

    # ### end Alembic commands ###


def downgrade():
    # ### commands auto generated by Alembic - please adjust! ###
    with op.batch_alter_table('feature_records', schema=None) as batch_op:
        batch_op.drop_index(batch_op.f('ix_feature_records_content_hash'))

    op.drop_table('feature_records')
    # ### end Alembic commands ###
