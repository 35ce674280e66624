package fixture.parse;

import org.eclipse.jdt.core.dom.*;

public class AstHelper {
    private ASTParser parser;
    private ICompilationUnit unit;

    void buildTree() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    void buildForRefactoring() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    void buildForSearch() {
        parser = ASTParser.newParser(AST.JLS3);
        parser.setKind(ASTParser.K_COMPILATION_UNIT);
        parser.setSource(unit);
        parser.setResolveBindings(true);
        parser.createAST(null);
    }

    String label(String name) {
        StringBuilder sb = new StringBuilder();
        sb.append(name);
        return sb.toString();
    }
}
