package fixture.parse;

import org.eclipse.jdt.core.dom.*;

public class ParserUtil {
    private ASTParser parser;
    private ICompilationUnit unit;

    public void parseUnit() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    public void parseWithBindings() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    public void reparse() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    public void parseForIndex() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    public String describe() {
        StringBuilder sb = new StringBuilder();
        sb.append("unit");
        return sb.toString();
    }
}
